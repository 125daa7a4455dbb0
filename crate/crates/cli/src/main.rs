fn main() {
    std::process::exit(lorentz_wire::run(std::env::args_os()));
}
