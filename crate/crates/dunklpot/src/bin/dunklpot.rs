fn main() {
    std::process::exit(dunklpot::cli::run(std::env::args_os()));
}
