use std::io;

fn main() {
    let code = soficonv::cli::dispatch(
        std::env::args_os(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    std::process::exit(code);
}
