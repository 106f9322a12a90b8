//! First-order Reed-Muller component codes and punctured decoding.

use rkem::code::Codebook;

fn main() {
    for v in [3u32, 4, 5] {
        let cb = Codebook::new(v).unwrap();
        println!(
            "v={v}: n={} codewords={} min distance={} corrects t={} after puncturing",
            cb.n(),
            cb.f(),
            cb.min_distance(),
            cb.t()
        );
    }

    let cb = Codebook::new(4).unwrap();
    let sent = 17;
    let hole = 5;
    let surviving = cb.full_mask() & !(1 << hole);
    let received = cb.word(sent) ^ 0b1000_0100_0000_0001 ^ (1 << hole);
    let decoded = cb.decode(received, surviving).unwrap();
    println!(
        "codeword {sent} with 3 errors and coordinate {hole} punctured decodes to {} at distance {}",
        decoded.index, decoded.distance
    );

    let four_errors = cb.word(sent) ^ 0b1000_0100_0001_0001;
    match cb.decode(four_errors, surviving) {
        Ok(d) => println!("with 4 errors: codeword {} at distance {}", d.index, d.distance),
        Err(e) => println!("with 4 errors: {e}"),
    }
}
