fn main() {
    let mut cfg = hydrotherm::scenarios::build_pile_field(hydrotherm::scenarios::PileFieldScale::Full);
    cfg.time.t_end_s = cfg.time.step_s * 3.0;
    cfg.time.snapshot_every = usize::MAX >> 1;
    for workers in [1usize, 2] {
        let sim = cfg.to_simulation(workers).unwrap();
        let (_, r) = sim.run(&mut []).unwrap();
        eprintln!(
            "workers {}  total {:.3}  aP {:.3}  sP {:.3}  aT {:.3}  sT {:.3}  (sum {:.3})",
            workers, r.total_s, r.phases.assemble_p, r.phases.solve_p, r.phases.assemble_t,
            r.phases.solve_t,
            r.phases.assemble_p + r.phases.solve_p + r.phases.assemble_t + r.phases.solve_t
        );
    }
}
