use std::io::Write;

fn main() {
    let out = seminf::cli::run(std::env::args_os());
    std::io::stdout().write_all(&out.stdout).expect("stdout");
    eprint!("{}", out.stderr);
    std::process::exit(out.code);
}
