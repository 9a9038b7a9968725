fn main() {
    eprintln!("satroute: command-line interface under construction");
    std::process::exit(2);
}
