fn main() {
    std::process::exit(soccermap::cli::run(std::env::args_os()));
}
