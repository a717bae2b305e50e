fn main() {
    std::process::exit(entpt::cli::run(std::env::args_os()));
}
