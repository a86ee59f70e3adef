import numpy as np
import pytest

from openfuture import ExperienceBasis, HermitianOperator, Scenario, StateVector, Step


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion of the build")
    config._acceptance = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is not None and rep.when == "call":
        number, title = marker.args
        item.config._acceptance.append((number, title, rep.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = sorted(getattr(config, "_acceptance", []))
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed in results:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {number}: {title}")


# --- random objects -----------------------------------------------------------

def random_hermitian(rng, n, scale=1.0):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_hamiltonian_scenario(rng, dim_S, dim_E, single_branch=False, basis_rotation=True):
    total = dim_S * dim_E
    if single_branch:
        eta = np.zeros(dim_S, dtype=complex)
        eta[rng.integers(dim_S)] = 1
        initial = np.kron(eta, random_state(rng, dim_E))
    else:
        initial = random_state(rng, total)
    U = random_unitary(rng, dim_S) if basis_rotation else np.eye(dim_S)
    if single_branch:
        initial = np.kron(U, np.eye(dim_E)) @ initial
    labels = [f"e{i}" for i in range(dim_S)]
    return Scenario(
        name="random",
        dims=(dim_S, dim_E),
        observer_factors=1,
        initial=StateVector(initial, (dim_S, dim_E)),
        basis=ExperienceBasis(labels, [U[:, i] for i in range(dim_S)]),
        hamiltonian=HermitianOperator(random_hermitian(rng, total)),
    )


def random_circuit_scenario(rng, dims, n_steps, dt=0.5):
    total = int(np.prod(dims))
    steps = []
    for _ in range(n_steps):
        k = int(rng.integers(1, len(dims) + 1))
        targets = tuple(int(x) for x in rng.permutation(len(dims))[:k])
        tdim = int(np.prod([dims[i] for i in targets]))
        steps.append(Step(random_unitary(rng, tdim), targets))
    dim_S = dims[0]
    return Scenario(
        name="random-circuit",
        dims=dims,
        observer_factors=1,
        initial=StateVector(random_state(rng, total), dims),
        basis=ExperienceBasis([f"e{i}" for i in range(dim_S)]),
        steps=steps,
        dt=dt,
    )


# --- independent oracles ------------------------------------------------------
# These deliberately avoid the package's eigendecomposition, reshaping and
# transposition paths.

def expm_series(A, terms=40):
    """exp(A) by scaling and squaring around a truncated Taylor series."""
    A = np.asarray(A, dtype=complex)
    norm = np.max(np.sum(np.abs(A), axis=1)) if A.size else 0.0
    k = max(0, int(np.ceil(np.log2(norm))) + 1) if norm > 0.5 else 0
    B = A / 2**k
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for j in range(1, terms):
        term = term @ B / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def embed_step(U, targets, dims):
    """Full-space matrix of U acting on `targets`, built entry by entry."""
    total = int(np.prod(dims))
    full = np.zeros((total, total), dtype=complex)
    tdims = [dims[k] for k in targets]
    for col in range(total):
        cin = np.unravel_index(col, dims)
        tin = np.ravel_multi_index([cin[k] for k in targets], tdims)
        for tout in range(U.shape[0]):
            amp = U[tout, tin]
            if amp == 0:
                continue
            cout = list(cin)
            for k, v in zip(targets, np.unravel_index(tout, tdims)):
                cout[k] = v
            full[np.ravel_multi_index(cout, dims), col] += amp
    return full


def relative_state(psi, eta, dim_E):
    """(<eta| x I) psi by explicit summation."""
    out = np.zeros(dim_E, dtype=complex)
    for i in range(eta.size):
        for e in range(dim_E):
            out[e] += np.conj(eta[i]) * psi[i * dim_E + e]
    return out


def brute_force_transition(sc, n_label, t, m_label, s):
    """Direct dense evaluation of the branch-relative transition formula."""
    import scipy.linalg

    dims = sc.dims
    dim_E = sc.factorization.dim_E
    total = int(np.prod(dims))
    psi0 = np.array(sc.initial.amps)
    if sc.is_hamiltonian:
        H = np.array(sc.hamiltonian.matrix)

        def U(a, b):
            return scipy.linalg.expm(-1j * H * (b - a))
    else:
        mats = [embed_step(np.array(st.unitary), st.targets, dims) for st in sc.steps]

        def U(a, b):
            i, j = round(a / sc.dt), round(b / sc.dt)
            out = np.eye(total, dtype=complex)
            for M in mats[i:j]:
                out = M @ out
            return out
    eta_n = np.array(sc.basis.matrix[:, sc.basis.labels.index(n_label)])
    eta_m = np.array(sc.basis.matrix[:, sc.basis.labels.index(m_label)])
    psi_t = U(0.0, t) @ psi0
    psi_s = U(0.0, s) @ psi0
    phi_n = relative_state(psi_t, eta_n, dim_E)
    phi_m = relative_state(psi_s, eta_m, dim_E)
    ket = U(t, s) @ np.kron(eta_n, phi_n)
    bra = np.kron(eta_m, phi_m)
    num = abs(np.vdot(bra, ket)) ** 2
    return num / (np.vdot(phi_m, phi_m).real * np.vdot(phi_n, phi_n).real)


@pytest.fixture
def rng():
    return np.random.default_rng(20100614)
