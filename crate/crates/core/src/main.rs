fn main() {
    std::process::exit(entrank::cli::run(std::env::args_os()));
}
