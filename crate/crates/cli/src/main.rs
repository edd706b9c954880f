fn main() {
    std::process::exit(tsprops_cli::run(std::env::args_os()));
}
