fn main() {
    std::process::exit(fockledger::harness::cli::main());
}
