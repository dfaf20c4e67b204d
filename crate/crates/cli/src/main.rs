fn main() {
    std::process::exit(hillband_cli::run(std::env::args_os()));
}
