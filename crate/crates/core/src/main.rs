fn main() {
    std::process::exit(lbsn_mobility::cli::main_with_args(std::env::args_os()));
}
