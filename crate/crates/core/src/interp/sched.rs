//! Deterministic cooperative scheduling of simulated processes.
//!
//! Every process runs on its own OS thread, but only the holder of the
//! baton executes. At each yield point the holder hands the baton to a
//! process drawn from a seeded RNG, so a seed fixes the interleaving.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex, MutexGuard};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::runtime::{ArrayId, RuntimeError, World};

pub(crate) struct Inner {
    pub world: World,
    /// Results of collective allocations, keyed by collective sequence number.
    pub allocs: HashMap<u64, Result<ArrayId, RuntimeError>>,
    state: State,
}

struct State {
    procs: usize,
    current: usize,
    done: Vec<bool>,
    /// Progress counter value at which a process last found its wait condition false.
    waited_at: Vec<Option<u64>>,
    progress: u64,
    rng: ChaCha8Rng,
    aborted: bool,
    barrier_count: usize,
    barrier_gen: u64,
}

impl State {
    fn pass(&mut self) {
        let live: Vec<usize> = (0..self.procs).filter(|&r| !self.done[r]).collect();
        if let Some(&next) = live.get(self.rng.gen_range(0..live.len().max(1))) {
            self.current = next;
        }
    }

    fn deadlocked(&self) -> bool {
        (0..self.procs).filter(|&r| !self.done[r]).all(|r| self.waited_at[r] == Some(self.progress))
    }
}

/// Why a process stopped before finishing.
#[derive(Debug)]
pub(crate) enum Stop {
    Fault(RuntimeError),
    Aborted,
}

pub(crate) struct Scheduler {
    inner: Mutex<Inner>,
    cv: Condvar,
}

impl Scheduler {
    pub fn new(world: World, seed: u64) -> Self {
        let procs = world.procs();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let current = rng.gen_range(0..procs);
        let state = State {
            procs,
            current,
            done: vec![false; procs],
            waited_at: vec![None; procs],
            progress: 0,
            rng,
            aborted: false,
            barrier_count: 0,
            barrier_gen: 0,
        };
        Scheduler { inner: Mutex::new(Inner { world, allocs: HashMap::new(), state }), cv: Condvar::new() }
    }

    pub fn into_world(self) -> World {
        self.inner.into_inner().unwrap_or_else(|e| e.into_inner()).world
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn wait_turn<'g>(&'g self, mut g: MutexGuard<'g, Inner>, rank: usize) -> Result<MutexGuard<'g, Inner>, Stop> {
        loop {
            if g.state.aborted {
                return Err(Stop::Aborted);
            }
            if g.state.current == rank {
                return Ok(g);
            }
            g = self.cv.wait(g).unwrap_or_else(|e| e.into_inner());
        }
    }

    /// Block until `rank` first holds the baton.
    pub fn start(&self, rank: usize) -> Result<(), Stop> {
        self.wait_turn(self.lock(), rank).map(drop)
    }

    /// Hand the baton on and wait to get it back.
    pub fn yield_now(&self, rank: usize) -> Result<(), Stop> {
        let mut g = self.lock();
        g.state.progress += 1;
        g.state.waited_at[rank] = None;
        g.state.pass();
        self.cv.notify_all();
        self.wait_turn(g, rank).map(drop)
    }

    /// Run `f` on the shared state. Only the baton holder calls this; it
    /// counts as progress, since `f` may satisfy another process's wait.
    pub fn with<T>(&self, f: impl FnOnce(&mut Inner) -> T) -> T {
        let mut g = self.lock();
        g.state.progress += 1;
        f(&mut g)
    }

    /// Retry `f` each time the baton comes back until it yields a value.
    pub fn wait_for<T>(
        &self,
        rank: usize,
        mut f: impl FnMut(&mut Inner) -> Result<Option<T>, RuntimeError>,
    ) -> Result<T, Stop> {
        let mut g = self.lock();
        loop {
            if g.state.aborted {
                return Err(Stop::Aborted);
            }
            match f(&mut g) {
                Err(e) => return Err(Stop::Fault(e)),
                Ok(Some(v)) => {
                    g.state.progress += 1;
                    g.state.waited_at[rank] = None;
                    return Ok(v);
                }
                Ok(None) => {
                    let p = g.state.progress;
                    g.state.waited_at[rank] = Some(p);
                    if g.state.deadlocked() {
                        return Err(Stop::Fault(RuntimeError::Deadlock(format!(
                            "every live process is waiting (rank {rank} last)"
                        ))));
                    }
                    g.state.pass();
                    self.cv.notify_all();
                    g = self.wait_turn(g, rank)?;
                }
            }
        }
    }

    /// Collective barrier over all processes.
    pub fn barrier(&self, rank: usize) -> Result<(), Stop> {
        let gen = self.with(|i| {
            let s = &mut i.state;
            let gen = s.barrier_gen;
            s.barrier_count += 1;
            if s.barrier_count == s.procs {
                s.barrier_count = 0;
                s.barrier_gen += 1;
            }
            gen
        });
        self.wait_for(rank, |i| Ok((i.state.barrier_gen > gen).then_some(())))
    }

    pub fn finish(&self, rank: usize) {
        let mut g = self.lock();
        g.state.done[rank] = true;
        g.state.progress += 1;
        g.state.pass();
        self.cv.notify_all();
    }

    /// Stop every process; called by the process that faulted.
    pub fn abort(&self, rank: usize) {
        let mut g = self.lock();
        g.state.done[rank] = true;
        g.state.aborted = true;
        self.cv.notify_all();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn barrier_releases_everyone_and_order_follows_seed() {
        let order = |seed| {
            let sched = Scheduler::new(World::new(3), seed);
            let log = Mutex::new(Vec::new());
            std::thread::scope(|s| {
                for r in 0..3 {
                    let (sched, log) = (&sched, &log);
                    s.spawn(move || {
                        sched.start(r).unwrap();
                        for _ in 0..3 {
                            log.lock().unwrap().push(r);
                            sched.yield_now(r).unwrap();
                        }
                        sched.barrier(r).unwrap();
                        sched.finish(r);
                    });
                }
            });
            log.into_inner().unwrap()
        };
        let a = order(1);
        assert_eq!(a.len(), 9);
        assert_eq!(a, order(1));
        assert!((0..20).any(|s| order(s) != a));
    }

    #[test]
    fn lonely_barrier_is_a_deadlock() {
        let sched = Scheduler::new(World::new(2), 0);
        let out = std::thread::scope(|s| {
            let hs: Vec<_> = (0..2)
                .map(|r| {
                    let sched = &sched;
                    s.spawn(move || {
                        sched.start(r)?;
                        if r == 0 {
                            let res = sched.barrier(r);
                            if res.is_err() {
                                sched.abort(r);
                            }
                            res?;
                        }
                        sched.finish(r);
                        Ok::<(), Stop>(())
                    })
                })
                .collect();
            hs.into_iter().map(|h| h.join().unwrap()).collect::<Vec<_>>()
        });
        assert!(matches!(out[0], Err(Stop::Fault(RuntimeError::Deadlock(_)))));
    }
}
