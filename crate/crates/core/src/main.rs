fn main() {
    std::process::exit(poissonsym::cli::main_with_args(std::env::args_os()));
}
