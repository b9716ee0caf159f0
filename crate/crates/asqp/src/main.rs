fn main() {
    std::process::exit(asqp::cli::run(std::env::args_os()));
}
