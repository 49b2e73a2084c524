fn main() {
    std::process::exit(qsig_core::cli::run(std::env::args_os()));
}
