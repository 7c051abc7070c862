use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match aalg_core::cli::run(std::env::args_os(), &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("aalg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
