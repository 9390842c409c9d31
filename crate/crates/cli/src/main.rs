fn main() {
    std::process::exit(qnetsim_cli::main_with_args(std::env::args().skip(1)));
}
