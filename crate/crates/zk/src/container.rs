//! Versioned byte containers for keys and proofs.
//!
//! Layout: `magic[4] || version: u16 BE || backend: u8 || len: u32 BE || payload`.
//! Trailing bytes are rejected.

use ark_bn254::{G1Affine, G2Affine};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize, Compress};

use crate::groth16;
use crate::ZkError;

pub const PK_MAGIC: [u8; 4] = *b"ZKPK";
pub const VK_MAGIC: [u8; 4] = *b"ZKVK";
pub const PROOF_MAGIC: [u8; 4] = *b"ZKPF";
pub const VERSION: u16 = 1;
pub const HEADER_LEN: usize = 4 + 2 + 1 + 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Backend {
    Groth16 = 1,
    /// Test-only, not zero-knowledge and not sound.
    #[cfg(feature = "transparent-backend")]
    Transparent = 0x7f,
}

impl Backend {
    fn from_byte(b: u8) -> Result<Self, ZkError> {
        match b {
            1 => Ok(Backend::Groth16),
            #[cfg(feature = "transparent-backend")]
            0x7f => Ok(Backend::Transparent),
            other => Err(ZkError::Malformed(format!("unsupported backend id {other:#04x}"))),
        }
    }
}

fn encode(magic: [u8; 4], backend: Backend, payload: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&magic);
    out.extend_from_slice(&VERSION.to_be_bytes());
    out.push(backend as u8);
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(payload);
    out
}

/// Splits a container into backend and payload after checking the header.
pub fn decode(magic: [u8; 4], bytes: &[u8]) -> Result<(Backend, &[u8]), ZkError> {
    if bytes.len() < HEADER_LEN {
        return Err(ZkError::Malformed(format!("{} bytes is shorter than the header", bytes.len())));
    }
    if bytes[..4] != magic {
        return Err(ZkError::Malformed("bad magic".into()));
    }
    let version = u16::from_be_bytes([bytes[4], bytes[5]]);
    if version != VERSION {
        return Err(ZkError::Malformed(format!("unsupported version {version}")));
    }
    let backend = Backend::from_byte(bytes[6])?;
    let len = u32::from_be_bytes(bytes[7..11].try_into().expect("4 bytes")) as usize;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != len {
        return Err(ZkError::Malformed(format!(
            "payload length {} does not match header {len}",
            payload.len()
        )));
    }
    Ok((backend, payload))
}

/// One field of an ark-serialize layout: a fixed-size item or a
/// `u64 len || items` sequence.
#[derive(Clone, Copy)]
enum Item {
    Fixed(usize),
    Seq(usize),
}

fn g1_size(c: Compress) -> usize {
    G1Affine::default().serialized_size(c)
}

fn g2_size(c: Compress) -> usize {
    G2Affine::default().serialized_size(c)
}

fn vk_layout(c: Compress) -> [Item; 5] {
    let (g1, g2) = (g1_size(c), g2_size(c));
    [Item::Fixed(g1), Item::Fixed(g2), Item::Fixed(g2), Item::Fixed(g2), Item::Seq(g1)]
}

fn pk_layout(c: Compress) -> Vec<Item> {
    let (g1, g2) = (g1_size(c), g2_size(c));
    let mut items = vec![Item::Fixed(32)];
    items.extend(vk_layout(c));
    items.extend([Item::Fixed(g1), Item::Fixed(g1)]);
    items.extend([Item::Seq(g1), Item::Seq(g1), Item::Seq(g2), Item::Seq(g1), Item::Seq(g1)]);
    items
}

/// Walks `layout` over `bytes` and fails if any length prefix overruns the
/// input or the sizes do not add up exactly. Run before deserializing so a
/// hostile prefix cannot trigger a huge allocation.
fn check_layout(mut bytes: &[u8], layout: &[Item]) -> Result<(), ZkError> {
    let short = || ZkError::Malformed("encoding shorter than its layout".into());
    for item in layout {
        let n = match *item {
            Item::Fixed(n) => n,
            Item::Seq(elem) => {
                let prefix: [u8; 8] = bytes.get(..8).ok_or_else(short)?.try_into().expect("8 bytes");
                bytes = &bytes[8..];
                let len = u64::from_le_bytes(prefix);
                if len > (bytes.len() / elem) as u64 {
                    return Err(ZkError::Malformed(format!("sequence length {len} exceeds input")));
                }
                len as usize * elem
            }
        };
        bytes = bytes.get(n..).ok_or_else(short)?;
    }
    if !bytes.is_empty() {
        return Err(ZkError::Malformed("trailing bytes after key".into()));
    }
    Ok(())
}

fn ark_err(e: ark_serialize::SerializationError) -> ZkError {
    ZkError::Malformed(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProvingKey {
    Groth16(groth16::ProvingKey),
    #[cfg(feature = "transparent-backend")]
    Transparent(crate::transparent::TransparentKey),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerificationKey {
    Groth16(groth16::VerifyingKey),
    #[cfg(feature = "transparent-backend")]
    Transparent(crate::transparent::TransparentKey),
}

impl ProvingKey {
    pub fn backend(&self) -> Backend {
        match self {
            ProvingKey::Groth16(_) => Backend::Groth16,
            #[cfg(feature = "transparent-backend")]
            ProvingKey::Transparent(_) => Backend::Transparent,
        }
    }

    pub fn verification_key(&self) -> VerificationKey {
        match self {
            ProvingKey::Groth16(pk) => VerificationKey::Groth16(pk.vk.clone()),
            #[cfg(feature = "transparent-backend")]
            ProvingKey::Transparent(k) => VerificationKey::Transparent(*k),
        }
    }

    /// Points are stored uncompressed.
    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = match self {
            ProvingKey::Groth16(pk) => {
                let mut buf = Vec::with_capacity(pk.uncompressed_size());
                pk.serialize_uncompressed(&mut buf).expect("writing to a Vec");
                buf
            }
            #[cfg(feature = "transparent-backend")]
            ProvingKey::Transparent(k) => k.to_bytes().to_vec(),
        };
        encode(PK_MAGIC, self.backend(), &payload)
    }

    /// Proving keys are local prover material, so curve and subgroup checks
    /// are skipped on load; a corrupted key only produces proofs that fail
    /// verification.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let (backend, payload) = decode(PK_MAGIC, bytes)?;
        match backend {
            Backend::Groth16 => {
                check_layout(payload, &pk_layout(Compress::No))?;
                let mut rd = payload;
                let pk = groth16::ProvingKey::deserialize_uncompressed_unchecked(&mut rd).map_err(ark_err)?;
                if !rd.is_empty() {
                    return Err(ZkError::Malformed("trailing bytes in proving key".into()));
                }
                Ok(ProvingKey::Groth16(pk))
            }
            #[cfg(feature = "transparent-backend")]
            Backend::Transparent => crate::transparent::TransparentKey::from_bytes(payload).map(ProvingKey::Transparent),
        }
    }
}

impl VerificationKey {
    pub fn backend(&self) -> Backend {
        match self {
            VerificationKey::Groth16(_) => Backend::Groth16,
            #[cfg(feature = "transparent-backend")]
            VerificationKey::Transparent(_) => Backend::Transparent,
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let payload = match self {
            VerificationKey::Groth16(vk) => {
                let mut buf = Vec::with_capacity(vk.compressed_size());
                vk.serialize_compressed(&mut buf).expect("writing to a Vec");
                buf
            }
            #[cfg(feature = "transparent-backend")]
            VerificationKey::Transparent(k) => k.to_bytes().to_vec(),
        };
        encode(VK_MAGIC, self.backend(), &payload)
    }

    /// Fully validated: every point must be on the curve and in the
    /// prime-order subgroup.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        let (backend, payload) = decode(VK_MAGIC, bytes)?;
        match backend {
            Backend::Groth16 => {
                check_layout(payload, &vk_layout(Compress::Yes))?;
                let mut rd = payload;
                let vk = groth16::VerifyingKey::deserialize_compressed(&mut rd).map_err(ark_err)?;
                if !rd.is_empty() {
                    return Err(ZkError::Malformed("trailing bytes in verification key".into()));
                }
                Ok(VerificationKey::Groth16(vk))
            }
            #[cfg(feature = "transparent-backend")]
            Backend::Transparent => {
                crate::transparent::TransparentKey::from_bytes(payload).map(VerificationKey::Transparent)
            }
        }
    }
}

/// Opaque proof container. Constructing one from arbitrary bytes never
/// fails; decoding happens during verification.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Proof(Vec<u8>);

impl std::fmt::Debug for Proof {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Proof({} bytes)", self.0.len())
    }
}

impl Proof {
    /// Container size of a Groth16 proof: three compressed points.
    pub const GROTH16_LEN: usize = HEADER_LEN + 32 + 64 + 32;

    pub(crate) fn groth16(p: &groth16::Proof) -> Self {
        let mut buf = Vec::with_capacity(128);
        p.serialize_compressed(&mut buf).expect("writing to a Vec");
        Proof(encode(PROOF_MAGIC, Backend::Groth16, &buf))
    }

    #[cfg(feature = "transparent-backend")]
    pub(crate) fn transparent(commitment: &[u8; 32]) -> Self {
        Proof(encode(PROOF_MAGIC, Backend::Transparent, commitment))
    }

    /// Checks the container header only.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ZkError> {
        decode(PROOF_MAGIC, bytes)?;
        Ok(Proof(bytes.to_vec()))
    }

    pub fn from_bytes_unchecked(bytes: &[u8]) -> Self {
        Proof(bytes.to_vec())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn backend(&self) -> Result<Backend, ZkError> {
        decode(PROOF_MAGIC, &self.0).map(|(b, _)| b)
    }

    pub(crate) fn payload(&self, expect: Backend) -> Result<&[u8], ZkError> {
        let (backend, payload) = decode(PROOF_MAGIC, &self.0)?;
        if backend != expect {
            return Err(ZkError::Malformed("proof backend does not match key".into()));
        }
        Ok(payload)
    }

    /// Points are validated (on curve, in subgroup, canonical encoding).
    pub fn decode_groth16(&self) -> Result<groth16::Proof, ZkError> {
        let mut rd = self.payload(Backend::Groth16)?;
        let p = groth16::Proof::deserialize_compressed(&mut rd).map_err(ark_err)?;
        if !rd.is_empty() {
            return Err(ZkError::Malformed("trailing bytes in proof".into()));
        }
        Ok(p)
    }
}
