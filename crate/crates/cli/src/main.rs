use std::io::Write;

fn main() {
    let out = hypoexp_cli::run(std::env::args_os(), &mut std::io::stdin().lock());
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}
