fn main() {
    let (code, report) = biext_cli::run_command(std::env::args_os());
    println!("{report}");
    std::process::exit(code);
}
