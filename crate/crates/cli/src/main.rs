fn main() {
    std::process::exit(ewa_cli::run(std::env::args_os()));
}
