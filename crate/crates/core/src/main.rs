fn main() {
    std::process::exit(decision_queue::cli::run(std::env::args_os()));
}
