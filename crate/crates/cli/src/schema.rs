//! Human-readable reference for the configuration format, printed by
//! `--print-schema`.

pub const SCHEMA: &str = r#"# molspin run configuration (TOML)
#
# Units: E in kV/cm, B in G, energies in MHz, dipoles in Debye,
# couplings J/2pi in Hz, lattice spacing in nm, times in ms.
#
# Axis values are either a number or an inclusive range table:
#   e_field = 5.0
#   b_field = { from = 8500, to = 8700, steps = 201 }
# A range with steps = 0 (or from = to with steps > 1) is an empty sweep
# and is rejected.
#
# States are bare basis kets used to seed adiabatic tracking:
#   { n = 0, m_n = 0, m_s = 0.5, m_i = [-0.5], label = "up" }
# m_s only for 2Sigma molecules; m_i has one entry per nucleus. Without a
# label the state is named like |0~0,1/2,-1/2>.

molecule = "KRb"     # registry name (KRb, YO) or an inline table:
                     # { name, kind = "1Sigma" | "2Sigma", rotational_constant,
                     #   dipole_moment, rotational_g?, nuclei = [{ label, spin,
                     #   g_factor, shielding?, quadrupole?, spin_rotation? }],
                     #   electron? = { spin_rotation, hyperfine_b, hyperfine_c,
                     #   g_factor }, spin_spin? = { scalar, tensor } }
                     # optional for couplings/cluster/squeeze with non-tracked
                     # encodings and for gap
n_max = 4            # highest rotational level kept (default 4)
seed = 0             # RNG seed for noise ensembles (default 0)
output = "out"       # output directory (the --out flag overrides it)

[scenario]
kind = "spectrum"    # one of the kinds below

# kind = "spectrum": tracked energies along one swept axis
#   e_field : Axis           b_field : Axis (at most one of the two a range)
#   states  : [State, ...]
#
# kind = "dipoles": pseudo-spin dipoles and couplings versus E
#   e_field : Axis  |  beta : Axis (Stark parameter Ed/B_e; exactly one)
#   b_field : number
#   up, down : State
#   dss?    : { main = [State, State], competing = [State, State] }
#             ([lower, upper] of each transition; reported in kHz)
#   a_nm    : number (default 500)
#
# kind = "alc": 2Sigma avoided crossing |0~0,1/2,m_i> / |1~1,-1/2,m_i>
#   e_field : number         window : [lo, hi] gap-minimum search range
#   grid    : search grid points (default 81)
#   m_i     : nuclear projection (default -0.5)
#   scan    : Axis in B reported around the crossing
#   a_nm    : number (default 500)
#
# kind = "dressed": microwave-dressed crossing of a 1Sigma molecule
#   e_field : number (default 0)  omega : Rabi frequency, MHz
#   delta   : detuning, MHz (default 0)
#   ground, excited, bare : State
#   window  : [start, end], swept from start toward end
#   grid    : search grid points (default 81)
#   scan_half_width : G around B_c (default 100)
#   scan_steps      : (default 41)
#   a_nm    : number (default 500)
#
# kind = "couplings" | "cluster" | "squeeze": lattice protocols
#   encoding : one of
#     { source = "dipoles", d_up, d_down, d_cross }
#     { source = "tracked", e_field, b_field, up = State, down = State,
#       seed_e_field? = 1.0, steps? = 40 }   (E ramped from seed_e_field)
#     { source = "couplings", j_z_nn_hz, j_perp_nn_hz }
#   lattice  : { dims = "chain" | "square", l, a_nm? = 500,
#                field_axis? = [0, 0, 1] }
#   cutoff_nm? : drop pairs farther apart than this
#   cluster only:
#     t2_ms?         white-noise coherence time
#     t_ms?          evolution time (default t_c)
#     frame_correct? remove single-site phases (default true)
#     static_noise?  { profile = "harmonic" | "gaussian", delta_e_hz?,
#                      sigma_hz?, samples? = 64, echo? = false }
#   squeeze only:
#     t_ms      : Axis
#     dynamics? : "xxz" (default) | "ising"
#
# kind = "gap": gap-protection estimate on L x L lattices
#   sizes : [L, ...]    j_perp_nn_hz : number    delta_e_hz : number
"#;
