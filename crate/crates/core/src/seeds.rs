//! Deterministic seed derivation so every sub-stream is reproducible from
//! one master seed.

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn mix2(master: u64, a: u64) -> u64 {
    splitmix(master ^ splitmix(a))
}

pub(crate) fn mix3(master: u64, a: u64, b: u64) -> u64 {
    splitmix(mix2(master, a) ^ splitmix(b.wrapping_add(0x6A09_E667_F3BC_C909)))
}
