fn main() {
    std::process::exit(minssd::cli::main());
}
