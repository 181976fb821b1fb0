fn main() { cmzv::cli::main_entry(); }
