//! Endomorphism rings of permutation modules.
//!
//! The crate is `no_std` (with `alloc`) and covers the algorithmic pipeline:
//! permutation groups and random elements ([`permgrp`]), matrices and modules
//! over small prime fields ([`gfmat`]), orbit-by-suborbit enumeration
//! ([`orbenum`]), Schur bases and intersection matrices ([`schur`]), exact
//! splitting of the endomorphism algebra ([`splitchar`]), reduction modulo a
//! prime ([`modular`]), character-theoretic candidate filters
//! ([`candfilter`]) and brute-force references for small cases ([`oracle`]).

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod candfilter;
pub mod fp;
pub mod fppoly;
pub mod gfmat;
pub mod hashing;
pub mod modular;
pub mod oracle;
pub mod orbenum;
pub mod perm;
pub mod permgrp;
pub mod qmat;
pub mod quadratic;
pub mod schur;
pub mod splitchar;
pub mod zpoly;

pub use perm::{GroupElem, Perm, Program, Word};
pub use permgrp::{GeneratedGroup, RandomStream};
