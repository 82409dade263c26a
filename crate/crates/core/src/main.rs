fn main() {
    std::process::exit(igusa_lab::cli::main_with_args(std::env::args_os()));
}
