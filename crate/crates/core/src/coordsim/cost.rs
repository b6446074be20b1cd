//! The word cost model.
//!
//! One word is one scalar: a coordinate, an id, an index, a count or a flag.
//! A horizontal point costs 2 words (its id is implicit in the exchange), a
//! vertical half-point `(x, id)` or `(id, y)` also costs 2, and a contact
//! that carries nothing costs 0.

use crate::point::{Point, PointId};

pub const POINT_WORDS: u64 = 2;
pub const HALF_POINT_WORDS: u64 = 2;
pub const SCALAR_WORDS: u64 = 1;
pub const FLAG_WORDS: u64 = 1;

/// Anything that can travel over a coordinator/site channel.
pub trait Payload {
    fn words(&self) -> u64;

    /// Ids of whole or half points carried by this payload.
    fn carried_ids(&self, _out: &mut Vec<PointId>) {}
}

pub fn word_cost<P: Payload + ?Sized>(payload: &P) -> u64 {
    payload.words()
}

impl Payload for () {
    fn words(&self) -> u64 {
        0
    }
}

macro_rules! scalar_payload {
    ($($t:ty),*) => {$(
        impl Payload for $t {
            fn words(&self) -> u64 {
                SCALAR_WORDS
            }
        }
    )*};
}

scalar_payload!(u32, u64, usize, i64, f64);

impl Payload for bool {
    fn words(&self) -> u64 {
        FLAG_WORDS
    }
}

impl Payload for Point {
    fn words(&self) -> u64 {
        POINT_WORDS
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        out.push(self.id);
    }
}

/// Alice's half of a point under vertical partition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XHalf {
    pub x: f64,
    pub id: PointId,
}

/// Bob's half of a point under vertical partition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YHalf {
    pub id: PointId,
    pub y: f64,
}

impl Payload for XHalf {
    fn words(&self) -> u64 {
        HALF_POINT_WORDS
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        out.push(self.id);
    }
}

impl Payload for YHalf {
    fn words(&self) -> u64 {
        HALF_POINT_WORDS
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        out.push(self.id);
    }
}

impl<T: Payload> Payload for [T] {
    fn words(&self) -> u64 {
        self.iter().map(Payload::words).sum()
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.iter().for_each(|p| p.carried_ids(out));
    }
}

impl<T: Payload> Payload for Vec<T> {
    fn words(&self) -> u64 {
        self.as_slice().words()
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.as_slice().carried_ids(out)
    }
}

impl<T: Payload> Payload for Option<T> {
    fn words(&self) -> u64 {
        self.as_ref().map_or(0, Payload::words)
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        if let Some(p) = self {
            p.carried_ids(out)
        }
    }
}

impl<A: Payload, B: Payload> Payload for (A, B) {
    fn words(&self) -> u64 {
        self.0.words() + self.1.words()
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.0.carried_ids(out);
        self.1.carried_ids(out);
    }
}

impl<A: Payload, B: Payload, C: Payload> Payload for (A, B, C) {
    fn words(&self) -> u64 {
        self.0.words() + self.1.words() + self.2.words()
    }

    fn carried_ids(&self, out: &mut Vec<PointId>) {
        self.0.carried_ids(out);
        self.1.carried_ids(out);
        self.2.carried_ids(out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_examples() {
        let pts = vec![Point::new(0, 0.1, 0.2), Point::new(1, 0.3, 0.4), Point::new(2, 0.5, 0.6)];
        assert_eq!(word_cost(&pts), 6);
        assert_eq!(word_cost(&YHalf { id: 7, y: 0.5 }), 2);
        assert_eq!(word_cost(&(2usize, 5usize, true)), 3);
        assert_eq!(word_cost(&()), 0);
        assert_eq!(word_cost(&Vec::<Point>::new()), 0);
        assert_eq!(word_cost(&None::<Point>), 0);

        let mut ids = Vec::new();
        (pts[0], Some(XHalf { x: 1.0, id: 9 })).carried_ids(&mut ids);
        assert_eq!(ids, vec![0, 9]);
    }
}
