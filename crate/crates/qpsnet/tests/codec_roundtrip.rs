//! Bulk randomized coverage for the frame codec: encode/decode round trips
//! over the full field space, decoder robustness against arbitrary and
//! mutated byte strings, and a proptest restatement of the round-trip law.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpsnet::frame_codec::{
    decode, encode, EncodingScheme, FrameHeader, FrameTrailer, MacAddr, Multiplexing,
    QduDescriptor, QuantumFrame,
};

fn random_mac(rng: &mut ChaCha8Rng) -> MacAddr {
    let mut octets = [0u8; 6];
    rng.fill(&mut octets);
    MacAddr(octets)
}

fn random_header(rng: &mut ChaCha8Rng) -> FrameHeader {
    let max_cutoff_ns = if rng.random_bool(0.3) {
        0
    } else {
        rng.random_range(1..=u64::MAX)
    };
    let elapsed_memory_ns = if max_cutoff_ns == 0 {
        rng.random_range(0..=u64::MAX)
    } else {
        rng.random_range(0..=max_cutoff_ns)
    };
    FrameHeader {
        dest: random_mac(rng),
        src: random_mac(rng),
        ttl_secs: rng.random(),
        qdu: QduDescriptor {
            payload_len: rng.random_range(1..=u16::MAX),
            encoding: EncodingScheme::from_id(rng.random()),
            emission_period_ns: rng.random_range(1..=u32::MAX) as u64,
            multiplexing: Multiplexing::from_id(rng.random()),
        },
        guard_time_ns: rng.random_range(0..=u32::MAX) as u64,
        elapsed_memory_ns,
        max_cutoff_ns,
        qec_protocol: rng.random(),
    }
}

#[test]
fn ten_thousand_random_headers_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for trial in 0..10_000 {
        let frame = QuantumFrame::Header(random_header(&mut rng));
        let bytes = encode(&frame).unwrap_or_else(|e| panic!("trial {trial}: encode: {e}"));
        let decoded = decode(&bytes).unwrap_or_else(|e| panic!("trial {trial}: decode: {e}"));
        assert_eq!(decoded.frame, frame, "trial {trial}");
        assert!(decoded.unknown_tlvs.is_empty(), "trial {trial}");
    }
}

#[test]
fn random_trailers_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for _ in 0..1_000 {
        let frame = QuantumFrame::Trailer(FrameTrailer {
            dest: random_mac(&mut rng),
            src: random_mac(&mut rng),
        });
        let bytes = encode(&frame).unwrap();
        assert_eq!(decode(&bytes).unwrap().frame, frame);
    }
}

#[test]
fn decoder_survives_arbitrary_bytes() {
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let mut decode_ok = 0u32;
    for _ in 0..50_000 {
        let len = rng.random_range(0..160);
        let mut bytes = vec![0u8; len];
        rng.fill(bytes.as_mut_slice());
        // Any outcome but a panic is acceptable here.
        if decode(&bytes).is_ok() {
            decode_ok += 1;
        }
    }
    // Pure noise should essentially never parse (the EtherType alone is a
    // 1-in-65536 filter); accept a handful to keep the bound honest.
    assert!(decode_ok < 10, "{decode_ok} noise buffers decoded cleanly");
}

#[test]
fn decoder_survives_mutated_frames() {
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let reference = {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        encode(&QuantumFrame::Header(random_header(&mut rng))).unwrap()
    };
    for _ in 0..50_000 {
        let mut bytes = reference.clone();
        for _ in 0..rng.random_range(1..=4) {
            let pos = rng.random_range(0..bytes.len());
            bytes[pos] = rng.random();
        }
        if rng.random_bool(0.3) {
            let cut = rng.random_range(0..=bytes.len());
            bytes.truncate(cut);
        }
        let _ = decode(&bytes);
    }
}

proptest! {
    #[test]
    fn header_round_trip_holds(
        dest in proptest::array::uniform6(any::<u8>()),
        src in proptest::array::uniform6(any::<u8>()),
        ttl in any::<u16>(),
        payload_len in 1u16..=u16::MAX,
        encoding_id in any::<u8>(),
        period in 1u32..=u32::MAX,
        mux_id in any::<u8>(),
        guard in any::<u32>(),
        elapsed in any::<u64>(),
        cutoff_enabled in any::<bool>(),
        qec in any::<u8>(),
    ) {
        let header = FrameHeader {
            dest: MacAddr(dest),
            src: MacAddr(src),
            ttl_secs: ttl,
            qdu: QduDescriptor {
                payload_len,
                encoding: EncodingScheme::from_id(encoding_id),
                emission_period_ns: period as u64,
                multiplexing: Multiplexing::from_id(mux_id),
            },
            guard_time_ns: guard as u64,
            elapsed_memory_ns: elapsed,
            max_cutoff_ns: if cutoff_enabled { elapsed.saturating_add(1) } else { 0 },
            qec_protocol: qec,
        };
        let frame = QuantumFrame::Header(header);
        let bytes = encode(&frame).unwrap();
        let decoded = decode(&bytes).unwrap();
        prop_assert_eq!(decoded.frame, frame);
        prop_assert!(decoded.unknown_tlvs.is_empty());
    }
}
