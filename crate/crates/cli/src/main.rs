fn main() {
    std::process::exit(fnel_cli::run(std::env::args_os()));
}
