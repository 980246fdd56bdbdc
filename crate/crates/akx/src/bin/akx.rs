fn main() {
    std::process::exit(akx::cli::run(std::env::args_os()));
}
