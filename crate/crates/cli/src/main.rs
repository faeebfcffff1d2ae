use std::io;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = codearena_cli::run(std::env::args_os(), &mut codearena_cli::Io {
        out: &mut out,
        err: &mut err,
    });
    ExitCode::from(code as u8)
}
