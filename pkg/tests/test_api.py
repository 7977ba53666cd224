"""
HTTP API Tests
"""
import pytest

from core.exceptions import ConsistencyError, ConvergenceError


def test_root(client):
    response = client.get("/")
    assert response.status_code == 200
    assert response.json()["status"] == "running"


def test_health_runs_numerical_self_test(client):
    response = client.get("/health/")
    assert response.status_code == 200
    data = response.json()
    assert data["status"] == "healthy"
    assert data["services"]["zeta2"] and data["services"]["zeta_star"]
    assert client.get("/health/readiness").json() == {"status": "ready"}


def test_verify_lem71(client):
    response = client.post("/api/v1/verify/lem71", json={"params": {"R": 1, "Q": 3}})
    assert response.status_code == 200
    data = response.json()
    assert data["command"] == "verify lem71"
    assert data["checks"][0]["status"] == "pass"
    assert data["wall_time_s"] is not None


def test_verify_rejects_bad_level(client):
    response = client.post("/api/v1/verify/lem71", json={"params": {"R": 9, "Q": 3}})
    assert response.status_code == 422
    assert response.json()["detail"].startswith("verify lem71 failed: ")


def test_unknown_check_is_rejected(client):
    response = client.post("/api/v1/verify/thm99", json={})
    assert response.status_code == 422
    assert "thm99" in response.json()["detail"]
    assert "thm72" in client.get("/api/v1/verify/").json()["checks"]


def test_report_endpoint(client):
    response = client.post("/api/v1/report/residue-f", json={})
    assert response.status_code == 200
    assert response.json()["checks"][0]["status"] == "report"


def test_table_as_csv(client):
    response = client.get("/api/v1/table/coeffs", params={"R": 1, "Q": 3, "format": "csv"})
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/csv")
    assert response.text.startswith("R,Q,N\n1,3,3\nm,n,value\n")


def test_table_rejects_shared_factor(client):
    assert client.get("/api/v1/table/coeffs", params={"R": 3, "Q": 3}).status_code == 422


@pytest.mark.parametrize(
    "error,status",
    [(ConvergenceError("K cap reached"), 503), (ConsistencyError("coefficient rules differ"), 500)],
)
def test_run_errors_map_to_status(client, monkeypatch, error, status):
    def fail(*args, **kwargs):
        raise error

    monkeypatch.setattr(client.app.state.verifier, "compute", fail)
    response = client.post("/api/v1/compute/f0", json={})
    assert response.status_code == status
    assert response.json() == {"detail": f"compute f0 failed: {error}"}
