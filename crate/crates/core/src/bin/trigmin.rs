fn main() {
    std::process::exit(trigmin::cli::main_from_args(std::env::args_os()));
}
