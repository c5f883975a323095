fn main() {
    std::process::exit(cubic_census::cli::run(std::env::args_os()));
}
