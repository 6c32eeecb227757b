use std::io;
use std::process;

fn main() {
    let status = fstcascade::cli::run(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    process::exit(status.code());
}
