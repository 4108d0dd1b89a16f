fn main() {
    std::process::exit(affine_fractals::cli::main());
}
