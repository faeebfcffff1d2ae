use std::process::Child;

/// Kills a child spawned in its own process group, including descendants,
/// and reaps it.
pub(crate) fn kill_tree(child: &mut Child) {
    #[cfg(unix)]
    {
        // SAFETY: kill(2) on the child's process group; the pgid equals the
        // child pid because it was spawned with process_group(0).
        unsafe {
            libc::kill(-(child.id() as i32), libc::SIGKILL);
        }
    }
    let _ = child.kill();
    let _ = child.wait();
}
