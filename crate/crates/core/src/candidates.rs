//! Rank-ordered doubly-linked list of entrance/exit candidates.

use serde::Serialize;

use crate::graph::VertexId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Entrance,
    Exit,
}

/// Handle to a list element. Stays valid (but detached) after deletion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EntryId(u32);

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Entry {
    vertex: VertexId,
    role: Role,
    prev: u32,
    next: u32,
    live: bool,
}

/// Arena-backed list. Elements are only ever appended at the back during
/// construction and removed from the back during the scan, but `next` may be
/// asked of any live element.
#[derive(Debug, Clone)]
pub struct CandidateList {
    entries: Vec<Entry>,
    head: u32,
    tail: u32,
    len: usize,
    entrance_of: Vec<u32>,
    exit_of: Vec<u32>,
}

impl CandidateList {
    pub fn new(vertex_count: usize) -> Self {
        CandidateList {
            entries: Vec::new(),
            head: NIL,
            tail: NIL,
            len: 0,
            entrance_of: vec![NIL; vertex_count],
            exit_of: vec![NIL; vertex_count],
        }
    }

    /// Appends `(v, role)`. Panics if `v` already has an entry for `role`.
    pub fn push_back(&mut self, v: VertexId, role: Role) -> EntryId {
        let id = u32::try_from(self.entries.len()).expect("candidate list overflow");
        let slot = match role {
            Role::Entrance => &mut self.entrance_of[v.index()],
            Role::Exit => &mut self.exit_of[v.index()],
        };
        assert_eq!(*slot, NIL, "{v} already listed as {role:?}");
        *slot = id;
        self.entries.push(Entry {
            vertex: v,
            role,
            prev: self.tail,
            next: NIL,
            live: true,
        });
        if self.tail == NIL {
            self.head = id;
        } else {
            self.entries[self.tail as usize].next = id;
        }
        self.tail = id;
        self.len += 1;
        EntryId(id)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn head(&self) -> Option<EntryId> {
        (self.head != NIL).then_some(EntryId(self.head))
    }

    pub fn tail(&self) -> Option<EntryId> {
        (self.tail != NIL).then_some(EntryId(self.tail))
    }

    pub fn next(&self, e: EntryId) -> Option<EntryId> {
        let next = self.entries[e.0 as usize].next;
        (next != NIL).then_some(EntryId(next))
    }

    pub fn delete_tail(&mut self) -> Option<EntryId> {
        if self.tail == NIL {
            return None;
        }
        let old = self.tail;
        let entry = &mut self.entries[old as usize];
        entry.live = false;
        let prev = entry.prev;
        entry.prev = NIL;
        self.tail = prev;
        if prev == NIL {
            self.head = NIL;
        } else {
            self.entries[prev as usize].next = NIL;
        }
        self.len -= 1;
        Some(EntryId(old))
    }

    pub fn vertex(&self, e: EntryId) -> VertexId {
        self.entries[e.0 as usize].vertex
    }

    pub fn role(&self, e: EntryId) -> Role {
        self.entries[e.0 as usize].role
    }

    pub fn is_live(&self, e: EntryId) -> bool {
        self.entries[e.0 as usize].live
    }

    pub fn entrance_entry(&self, v: VertexId) -> Option<EntryId> {
        let id = self.entrance_of[v.index()];
        (id != NIL).then_some(EntryId(id))
    }

    pub fn exit_entry(&self, v: VertexId) -> Option<EntryId> {
        let id = self.exit_of[v.index()];
        (id != NIL).then_some(EntryId(id))
    }

    /// Live elements from head to tail.
    pub fn iter(&self) -> impl Iterator<Item = (VertexId, Role)> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            if cur == NIL {
                return None;
            }
            let e = &self.entries[cur as usize];
            cur = e.next;
            Some((e.vertex, e.role))
        })
    }
}
