fn main() {
    std::process::exit(symseq::cli::run(std::env::args_os()));
}
