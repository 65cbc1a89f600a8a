use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let mut err = stderr.lock();
    let code = squeezelink::cli::run(std::env::args_os(), &mut out, &mut err);
    if out.flush().is_err() && code == 0 {
        return ExitCode::from(2);
    }
    ExitCode::from(code as u8)
}
