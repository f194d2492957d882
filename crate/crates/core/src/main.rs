fn main() {
    std::process::exit(polloss::cli::run(std::env::args_os()));
}
