//! Encoder and decoder for the hybrid link-layer control frames that
//! announce and delimit quantum payloads.
//!
//! The format is a profiled LLDP variant: an Ethernet-style MAC header
//! (destination, source, EtherType 0x88CC) followed by a TLV list that ends
//! with an End TLV. Each TLV carries a 16-bit big-endian prefix packing a
//! 7-bit type and a 9-bit length. Standard chassis-id, port-id, and
//! time-to-live TLVs are kept for interoperability with ordinary LLDP
//! sniffers; everything quantum rides in organizationally specific TLVs
//! (type 127) under the all-zero OUI with one subtype per field.
//!
//! A frame is either a header, which precedes its quantum payload and
//! carries the full descriptor set, or a trailer, which closes the payload
//! and carries addressing plus the role marker only. Multi-byte integers
//! are big-endian on the wire. Decoding is strict about structure
//! (truncation, missing End, trailing bytes, malformed known TLVs are all
//! errors) but collects unknown TLV types and foreign-OUI TLVs for the
//! caller instead of rejecting them.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// EtherType marking a frame as quantum link-layer control traffic.
pub const QUANTUM_ETHERTYPE: u16 = 0x88CC;

const TLV_END: u8 = 0;
const TLV_CHASSIS_ID: u8 = 1;
const TLV_PORT_ID: u8 = 2;
const TLV_TTL: u8 = 3;
const TLV_ORG_SPECIFIC: u8 = 127;

/// All organizationally specific TLVs in this profile use the zero OUI.
const ORG_OUI: [u8; 3] = [0x00, 0x00, 0x00];
const SUB_ROLE: u8 = 1;
const SUB_QDU: u8 = 2;
const SUB_ELAPSED: u8 = 3;
const SUB_CUTOFF: u8 = 4;
const SUB_QEC: u8 = 5;
const SUB_GUARD: u8 = 6;

const ROLE_HEADER: u8 = 0x00;
const ROLE_TRAILER: u8 = 0x01;

/// Chassis-id subtype for a MAC address, per the LLDP basis format.
const CHASSIS_SUBTYPE_MAC: u8 = 4;
/// Port-id subtype for a MAC address.
const PORT_SUBTYPE_MAC: u8 = 3;

const MAC_HEADER_LEN: usize = 14;

/// A 48-bit link-layer address.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MacAddr(pub [u8; 6]);

impl MacAddr {
    pub fn octets(&self) -> [u8; 6] {
        self.0
    }
}

impl fmt::Display for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = &self.0;
        write!(
            f,
            "{:02x}:{:02x}:{:02x}:{:02x}:{:02x}:{:02x}",
            o[0], o[1], o[2], o[3], o[4], o[5]
        )
    }
}

impl fmt::Debug for MacAddr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MacAddr({self})")
    }
}

/// Error from parsing a textual MAC address.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid MAC address {input:?}: expected six colon-separated hex octets")]
pub struct MacAddrParseError {
    pub input: String,
}

impl FromStr for MacAddr {
    type Err = MacAddrParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MacAddrParseError {
            input: s.to_string(),
        };
        let mut octets = [0u8; 6];
        let mut count = 0;
        for part in s.split(':') {
            if count == 6 || part.len() != 2 {
                return Err(bad());
            }
            octets[count] = u8::from_str_radix(part, 16).map_err(|_| bad())?;
            count += 1;
        }
        if count != 6 {
            return Err(bad());
        }
        Ok(MacAddr(octets))
    }
}

/// How the quantum payload is physically encoded.
///
/// Ids 0 and 1 decode to the named variants; other ids are preserved
/// verbatim in `Other`. Construct via [`EncodingScheme::from_id`] to keep
/// round trips stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncodingScheme {
    /// BB84 polarization-basis single photons.
    Bb84Polarization,
    /// One half of an entangled pair.
    EprHalf,
    Other(u8),
}

impl EncodingScheme {
    pub fn from_id(id: u8) -> Self {
        match id {
            0 => EncodingScheme::Bb84Polarization,
            1 => EncodingScheme::EprHalf,
            n => EncodingScheme::Other(n),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            EncodingScheme::Bb84Polarization => 0,
            EncodingScheme::EprHalf => 1,
            EncodingScheme::Other(n) => n,
        }
    }
}

/// How consecutive payload qubits share the medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplexing {
    /// Time-division: one qubit per emission period.
    Tdm,
    /// Wavelength-division.
    Wdm,
    Other(u8),
}

impl Multiplexing {
    pub fn from_id(id: u8) -> Self {
        match id {
            0 => Multiplexing::Tdm,
            1 => Multiplexing::Wdm,
            n => Multiplexing::Other(n),
        }
    }

    pub fn id(self) -> u8 {
        match self {
            Multiplexing::Tdm => 0,
            Multiplexing::Wdm => 1,
            Multiplexing::Other(n) => n,
        }
    }
}

/// Descriptor of the quantum payload that follows a header frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QduDescriptor {
    /// Number of payload qubits; at least 1.
    pub payload_len: u16,
    pub encoding: EncodingScheme,
    /// Spacing between consecutive payload qubits; on the wire as 32 bits.
    pub emission_period_ns: u64,
    pub multiplexing: Multiplexing,
}

/// Control frame sent ahead of a quantum payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub dest: MacAddr,
    pub src: MacAddr,
    /// Advertisement time-to-live in seconds, as in plain LLDP.
    pub ttl_secs: u16,
    pub qdu: QduDescriptor,
    /// Burst guard budget granted to the path; on the wire as 32 bits.
    pub guard_time_ns: u64,
    /// Memory dwell the payload has accumulated so far.
    pub elapsed_memory_ns: u64,
    /// Dwell bound after which the payload is considered expired; zero
    /// means no bound.
    pub max_cutoff_ns: u64,
    /// Identifier of the error-correction protocol protecting the payload.
    pub qec_protocol: u8,
}

/// Control frame closing a quantum payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameTrailer {
    pub dest: MacAddr,
    pub src: MacAddr,
}

/// Either kind of control frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantumFrame {
    Header(FrameHeader),
    Trailer(FrameTrailer),
}

impl QuantumFrame {
    pub fn dest(&self) -> MacAddr {
        match self {
            QuantumFrame::Header(h) => h.dest,
            QuantumFrame::Trailer(t) => t.dest,
        }
    }

    pub fn src(&self) -> MacAddr {
        match self {
            QuantumFrame::Header(h) => h.src,
            QuantumFrame::Trailer(t) => t.src,
        }
    }
}

/// A TLV the decoder did not recognize, preserved verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTlv {
    pub tlv_type: u8,
    /// Byte offset of the TLV prefix within the frame.
    pub offset: usize,
    pub value: Vec<u8>,
}

/// Result of a successful decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub frame: QuantumFrame,
    /// Unknown TLV types and foreign-OUI TLVs, in wire order.
    pub unknown_tlvs: Vec<RawTlv>,
}

/// Encoding failures.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    /// A field does not fit its wire width.
    #[error("{field} = {value} exceeds its wire width (max {max})")]
    FieldOverflow {
        field: &'static str,
        value: u64,
        max: u64,
    },
    /// The frame violates a structural rule; see [`FrameHeader::validate`].
    #[error("invalid frame: {reason}")]
    InvalidFrame { reason: &'static str },
}

/// Decoding failures. Offsets are byte positions within the input.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    /// Input ended inside the element starting at `offset`.
    #[error("truncated frame: element at offset {offset} runs past the end")]
    Truncated { offset: usize },
    /// The EtherType field is not 0x88CC.
    #[error("unexpected EtherType 0x{found:04x}, expected 0x88cc")]
    BadEtherType { found: u16 },
    /// The TLV list ran out of bytes without an End TLV.
    #[error("missing End TLV: list ends at offset {offset} without terminator")]
    MissingEnd { offset: usize },
    /// A TLV required for the frame's role is absent.
    #[error("mandatory TLV missing: {tlv}")]
    MissingTlv { tlv: &'static str },
    /// A recognized TLV has the wrong shape or an illegal value.
    #[error("malformed {what} TLV at offset {offset}: {reason}")]
    MalformedTlv {
        what: &'static str,
        offset: usize,
        reason: &'static str,
    },
    /// Bytes follow the End TLV.
    #[error("{count} trailing byte(s) after End TLV at offset {offset}")]
    TrailingBytes { offset: usize, count: usize },
}

impl FrameHeader {
    /// Structural validity: a payload exists, qubits are actually spaced
    /// out, and the elapsed dwell has not already passed the cutoff.
    pub fn validate(&self) -> Result<(), EncodeError> {
        if self.qdu.payload_len == 0 {
            return Err(EncodeError::InvalidFrame {
                reason: "payload_len must be at least 1",
            });
        }
        if self.qdu.emission_period_ns == 0 {
            return Err(EncodeError::InvalidFrame {
                reason: "emission_period_ns must be positive",
            });
        }
        if !self.is_live() {
            return Err(EncodeError::InvalidFrame {
                reason: "elapsed memory already exceeds the cutoff",
            });
        }
        Ok(())
    }

    /// Whether the payload is still within its memory cutoff.
    pub fn is_live(&self) -> bool {
        self.max_cutoff_ns == 0 || self.elapsed_memory_ns <= self.max_cutoff_ns
    }
}

/// Outcome of advancing a header's elapsed-memory clock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MemoryBump {
    /// Still within the cutoff (or there is none).
    Live(FrameHeader),
    /// The added dwell pushed the payload past its cutoff.
    Expired(FrameHeader),
}

/// Adds `delta_ns` of memory dwell to a header, saturating, and reports
/// whether the payload crossed its cutoff. A zero cutoff never expires.
pub fn bump_elapsed_memory(header: &FrameHeader, delta_ns: u64) -> MemoryBump {
    let mut updated = *header;
    updated.elapsed_memory_ns = header.elapsed_memory_ns.saturating_add(delta_ns);
    if updated.is_live() {
        MemoryBump::Live(updated)
    } else {
        MemoryBump::Expired(updated)
    }
}

/// Serializes a frame to wire bytes.
///
/// Headers are validated first; a header whose `guard_time_ns` or
/// `emission_period_ns` exceeds 32 bits is rejected rather than silently
/// wrapped.
pub fn encode(frame: &QuantumFrame) -> Result<Vec<u8>, EncodeError> {
    match frame {
        QuantumFrame::Header(h) => encode_header(h),
        QuantumFrame::Trailer(t) => Ok(encode_trailer(t)),
    }
}

fn check_u32(field: &'static str, value: u64) -> Result<u32, EncodeError> {
    u32::try_from(value).map_err(|_| EncodeError::FieldOverflow {
        field,
        value,
        max: u32::MAX as u64,
    })
}

fn put_mac_header(out: &mut Vec<u8>, dest: MacAddr, src: MacAddr) {
    out.extend_from_slice(&dest.0);
    out.extend_from_slice(&src.0);
    out.extend_from_slice(&QUANTUM_ETHERTYPE.to_be_bytes());
}

fn put_tlv(out: &mut Vec<u8>, tlv_type: u8, value: &[u8]) {
    debug_assert!(value.len() <= 0x1FF, "TLV value too long for 9-bit length");
    let prefix = ((tlv_type as u16) << 9) | (value.len() as u16 & 0x1FF);
    out.extend_from_slice(&prefix.to_be_bytes());
    out.extend_from_slice(value);
}

fn put_org_tlv(out: &mut Vec<u8>, subtype: u8, payload: &[u8]) {
    let mut value = Vec::with_capacity(4 + payload.len());
    value.extend_from_slice(&ORG_OUI);
    value.push(subtype);
    value.extend_from_slice(payload);
    put_tlv(out, TLV_ORG_SPECIFIC, &value);
}

fn encode_header(h: &FrameHeader) -> Result<Vec<u8>, EncodeError> {
    h.validate()?;
    let period = check_u32("emission_period_ns", h.qdu.emission_period_ns)?;
    let guard = check_u32("guard_time_ns", h.guard_time_ns)?;

    let mut out = Vec::with_capacity(104);
    put_mac_header(&mut out, h.dest, h.src);

    let mut chassis = Vec::with_capacity(7);
    chassis.push(CHASSIS_SUBTYPE_MAC);
    chassis.extend_from_slice(&h.src.0);
    put_tlv(&mut out, TLV_CHASSIS_ID, &chassis);

    let mut port = Vec::with_capacity(7);
    port.push(PORT_SUBTYPE_MAC);
    port.extend_from_slice(&h.src.0);
    put_tlv(&mut out, TLV_PORT_ID, &port);

    put_tlv(&mut out, TLV_TTL, &h.ttl_secs.to_be_bytes());

    put_org_tlv(&mut out, SUB_ROLE, &[ROLE_HEADER]);

    let mut qdu = Vec::with_capacity(8);
    qdu.extend_from_slice(&h.qdu.payload_len.to_be_bytes());
    qdu.push(h.qdu.encoding.id());
    qdu.extend_from_slice(&period.to_be_bytes());
    qdu.push(h.qdu.multiplexing.id());
    put_org_tlv(&mut out, SUB_QDU, &qdu);

    put_org_tlv(&mut out, SUB_ELAPSED, &h.elapsed_memory_ns.to_be_bytes());
    put_org_tlv(&mut out, SUB_CUTOFF, &h.max_cutoff_ns.to_be_bytes());
    put_org_tlv(&mut out, SUB_QEC, &[h.qec_protocol]);
    put_org_tlv(&mut out, SUB_GUARD, &guard.to_be_bytes());

    put_tlv(&mut out, TLV_END, &[]);
    Ok(out)
}

fn encode_trailer(t: &FrameTrailer) -> Vec<u8> {
    let mut out = Vec::with_capacity(23);
    put_mac_header(&mut out, t.dest, t.src);
    put_org_tlv(&mut out, SUB_ROLE, &[ROLE_TRAILER]);
    put_tlv(&mut out, TLV_END, &[]);
    out
}

/// Accumulates parsed TLVs during decode.
#[derive(Default)]
struct Fields {
    role: Option<u8>,
    chassis: Option<MacAddr>,
    port: Option<MacAddr>,
    ttl_secs: Option<u16>,
    qdu: Option<QduDescriptor>,
    elapsed: Option<u64>,
    cutoff: Option<u64>,
    qec: Option<u8>,
    guard: Option<u64>,
}

fn set_once<T>(
    slot: &mut Option<T>,
    value: T,
    what: &'static str,
    offset: usize,
) -> Result<(), DecodeError> {
    if slot.is_some() {
        return Err(DecodeError::MalformedTlv {
            what,
            offset,
            reason: "duplicate of a singleton TLV",
        });
    }
    *slot = Some(value);
    Ok(())
}

fn be_u16(bytes: &[u8]) -> u16 {
    u16::from_be_bytes([bytes[0], bytes[1]])
}

fn be_u32(bytes: &[u8]) -> u32 {
    u32::from_be_bytes([bytes[0], bytes[1], bytes[2], bytes[3]])
}

fn be_u64(bytes: &[u8]) -> u64 {
    let mut buf = [0u8; 8];
    buf.copy_from_slice(bytes);
    u64::from_be_bytes(buf)
}

fn expect_len(
    what: &'static str,
    offset: usize,
    payload: &[u8],
    want: usize,
) -> Result<(), DecodeError> {
    if payload.len() != want {
        return Err(DecodeError::MalformedTlv {
            what,
            offset,
            reason: "wrong value length",
        });
    }
    Ok(())
}

/// Parses wire bytes into a frame plus any unrecognized TLVs.
pub fn decode(bytes: &[u8]) -> Result<DecodedFrame, DecodeError> {
    if bytes.len() < MAC_HEADER_LEN {
        // Report the offset of the first element the input cannot hold.
        let offset = if bytes.len() < 6 {
            0
        } else if bytes.len() < 12 {
            6
        } else {
            12
        };
        return Err(DecodeError::Truncated { offset });
    }
    let dest = MacAddr(bytes[0..6].try_into().expect("length checked"));
    let src = MacAddr(bytes[6..12].try_into().expect("length checked"));
    let ethertype = be_u16(&bytes[12..14]);
    if ethertype != QUANTUM_ETHERTYPE {
        return Err(DecodeError::BadEtherType { found: ethertype });
    }

    let mut fields = Fields::default();
    let mut unknown_tlvs = Vec::new();
    let mut pos = MAC_HEADER_LEN;
    let mut end_seen = false;

    while pos < bytes.len() {
        let start = pos;
        if pos + 2 > bytes.len() {
            return Err(DecodeError::Truncated { offset: start });
        }
        let prefix = be_u16(&bytes[pos..pos + 2]);
        pos += 2;
        let tlv_type = (prefix >> 9) as u8;
        let len = (prefix & 0x1FF) as usize;
        if pos + len > bytes.len() {
            return Err(DecodeError::Truncated { offset: start });
        }
        let value = &bytes[pos..pos + len];
        pos += len;

        if tlv_type == TLV_END {
            if len != 0 {
                return Err(DecodeError::MalformedTlv {
                    what: "end",
                    offset: start,
                    reason: "End TLV must have zero length",
                });
            }
            end_seen = true;
            break;
        }
        parse_tlv(tlv_type, start, value, &mut fields, &mut unknown_tlvs)?;
    }

    if !end_seen {
        return Err(DecodeError::MissingEnd { offset: pos });
    }
    if pos < bytes.len() {
        return Err(DecodeError::TrailingBytes {
            offset: pos,
            count: bytes.len() - pos,
        });
    }

    let role = fields.role.ok_or(DecodeError::MissingTlv { tlv: "role" })?;
    let frame = match role {
        ROLE_HEADER => {
            fields.chassis.ok_or(DecodeError::MissingTlv {
                tlv: "chassis id",
            })?;
            fields.port.ok_or(DecodeError::MissingTlv { tlv: "port id" })?;
            QuantumFrame::Header(FrameHeader {
                dest,
                src,
                ttl_secs: fields.ttl_secs.ok_or(DecodeError::MissingTlv {
                    tlv: "time to live",
                })?,
                qdu: fields.qdu.ok_or(DecodeError::MissingTlv {
                    tlv: "payload descriptor",
                })?,
                guard_time_ns: fields.guard.ok_or(DecodeError::MissingTlv {
                    tlv: "guard time",
                })?,
                elapsed_memory_ns: fields.elapsed.ok_or(DecodeError::MissingTlv {
                    tlv: "elapsed memory",
                })?,
                max_cutoff_ns: fields.cutoff.ok_or(DecodeError::MissingTlv {
                    tlv: "memory cutoff",
                })?,
                qec_protocol: fields.qec.ok_or(DecodeError::MissingTlv {
                    tlv: "error correction protocol",
                })?,
            })
        }
        _ => QuantumFrame::Trailer(FrameTrailer { dest, src }),
    };
    Ok(DecodedFrame {
        frame,
        unknown_tlvs,
    })
}

fn parse_tlv(
    tlv_type: u8,
    offset: usize,
    value: &[u8],
    fields: &mut Fields,
    unknown: &mut Vec<RawTlv>,
) -> Result<(), DecodeError> {
    match tlv_type {
        TLV_CHASSIS_ID => {
            expect_len("chassis id", offset, value, 7)?;
            if value[0] != CHASSIS_SUBTYPE_MAC {
                return Err(DecodeError::MalformedTlv {
                    what: "chassis id",
                    offset,
                    reason: "unsupported chassis id subtype",
                });
            }
            let mac = MacAddr(value[1..7].try_into().expect("length checked"));
            set_once(&mut fields.chassis, mac, "chassis id", offset)
        }
        TLV_PORT_ID => {
            expect_len("port id", offset, value, 7)?;
            if value[0] != PORT_SUBTYPE_MAC {
                return Err(DecodeError::MalformedTlv {
                    what: "port id",
                    offset,
                    reason: "unsupported port id subtype",
                });
            }
            let mac = MacAddr(value[1..7].try_into().expect("length checked"));
            set_once(&mut fields.port, mac, "port id", offset)
        }
        TLV_TTL => {
            expect_len("time to live", offset, value, 2)?;
            set_once(&mut fields.ttl_secs, be_u16(value), "time to live", offset)
        }
        TLV_ORG_SPECIFIC => parse_org_tlv(offset, value, fields, unknown),
        other => {
            unknown.push(RawTlv {
                tlv_type: other,
                offset,
                value: value.to_vec(),
            });
            Ok(())
        }
    }
}

fn parse_org_tlv(
    offset: usize,
    value: &[u8],
    fields: &mut Fields,
    unknown: &mut Vec<RawTlv>,
) -> Result<(), DecodeError> {
    if value.len() < 4 {
        return Err(DecodeError::MalformedTlv {
            what: "org-specific",
            offset,
            reason: "shorter than OUI plus subtype",
        });
    }
    if value[0..3] != ORG_OUI {
        unknown.push(RawTlv {
            tlv_type: TLV_ORG_SPECIFIC,
            offset,
            value: value.to_vec(),
        });
        return Ok(());
    }
    let subtype = value[3];
    let payload = &value[4..];
    match subtype {
        SUB_ROLE => {
            expect_len("role", offset, payload, 1)?;
            if payload[0] != ROLE_HEADER && payload[0] != ROLE_TRAILER {
                return Err(DecodeError::MalformedTlv {
                    what: "role",
                    offset,
                    reason: "role must be 0 (header) or 1 (trailer)",
                });
            }
            set_once(&mut fields.role, payload[0], "role", offset)
        }
        SUB_QDU => {
            expect_len("payload descriptor", offset, payload, 8)?;
            let qdu = QduDescriptor {
                payload_len: be_u16(&payload[0..2]),
                encoding: EncodingScheme::from_id(payload[2]),
                emission_period_ns: be_u32(&payload[3..7]) as u64,
                multiplexing: Multiplexing::from_id(payload[7]),
            };
            set_once(&mut fields.qdu, qdu, "payload descriptor", offset)
        }
        SUB_ELAPSED => {
            expect_len("elapsed memory", offset, payload, 8)?;
            set_once(&mut fields.elapsed, be_u64(payload), "elapsed memory", offset)
        }
        SUB_CUTOFF => {
            expect_len("memory cutoff", offset, payload, 8)?;
            set_once(&mut fields.cutoff, be_u64(payload), "memory cutoff", offset)
        }
        SUB_QEC => {
            expect_len("error correction protocol", offset, payload, 1)?;
            set_once(
                &mut fields.qec,
                payload[0],
                "error correction protocol",
                offset,
            )
        }
        SUB_GUARD => {
            expect_len("guard time", offset, payload, 4)?;
            set_once(
                &mut fields.guard,
                be_u32(payload) as u64,
                "guard time",
                offset,
            )
        }
        _ => {
            unknown.push(RawTlv {
                tlv_type: TLV_ORG_SPECIFIC,
                offset,
                value: value.to_vec(),
            });
            Ok(())
        }
    }
}
