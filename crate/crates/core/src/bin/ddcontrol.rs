fn main() {
    std::process::exit(ddcontrol::cli::main(std::env::args_os()));
}
