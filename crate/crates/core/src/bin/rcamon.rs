fn main() {
    std::process::exit(rca_monitor::cli::run(std::env::args_os()));
}
