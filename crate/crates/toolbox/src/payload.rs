use sim_kernel::{Payload, HEADER_BITS};

/// Header-only control message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Signal;

impl Payload for Signal {
    fn bits(&self, _: u32) -> u32 {
        HEADER_BITS
    }
}

/// One word-sized number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Count(pub u64);

impl Payload for Count {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + word
    }
}

/// Height of a subtree and the longest path seen inside it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub height: u32,
    pub longest: u32,
}

impl Payload for Span {
    fn bits(&self, word: u32) -> u32 {
        HEADER_BITS + 2 * word
    }
}
