fn main() {
    std::process::exit(selfstab::cli::main());
}
