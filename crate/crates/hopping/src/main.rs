fn main() {
    std::process::exit(hopping::cli::run(std::env::args_os()));
}
