fn main() {
    std::process::exit(lanefowler::cli::run(std::env::args_os()));
}
