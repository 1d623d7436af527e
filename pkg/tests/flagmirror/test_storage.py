import csv
import os
import sqlite3
import tempfile

from flagmirror.critical import karp_points
from flagmirror.storage import ReportStorage, new_run_id
from flagmirror.verify import check_main_theorem, check_structure, combine_reports


def test_report_storage_creates_tables_and_inserts(fl421):
    report = combine_reports(check_main_theorem(fl421, 3, seed=0, max_workers=1), check_structure(fl421))
    with tempfile.TemporaryDirectory() as d:
        db = os.path.join(d, "reports_test.sqlite3")
        st = ReportStorage(db, csv_dir=d)
        run_id = st.write_verification([report])
        st.write_critical(karp_points(4, 2, 1), run_id=run_id)
        st.close()
        conn = sqlite3.connect(db)
        c = conn.cursor()
        c.execute("SELECT COUNT(*) FROM verification_runs")
        assert c.fetchone()[0] == 1
        c.execute("SELECT shape, trials, passed, externals FROM verification_runs")
        assert c.fetchone() == ("4:2,1", 3, 1, "cumulative")
        c.execute("SELECT COUNT(*) FROM critical_points WHERE run_id = ?", (run_id,))
        assert c.fetchone()[0] == 6
        conn.close()
        with open(os.path.join(d, "critical_points.csv"), encoding="utf-8") as fp:
            rows = list(csv.reader(fp))
        assert rows[0][:3] == ["run_id", "shape", "source"]
        assert len(rows) == 7


def test_csv_header_written_once(gr42):
    with tempfile.TemporaryDirectory() as d:
        st = ReportStorage(os.path.join(d, "db.sqlite3"), csv_dir=d)
        st.write_verification([check_structure(gr42)])
        st.write_verification([check_structure(gr42)])
        st.close()
        with open(os.path.join(d, "verification_runs.csv"), encoding="utf-8") as fp:
            rows = list(csv.reader(fp))
        assert len(rows) == 3
        assert rows[0][0] == "run_id"
        # structure checks carry no seed
        assert rows[1][3] == ""


def test_new_run_id_is_short_and_unique():
    ids = {new_run_id() for _ in range(50)}
    assert len(ids) == 50
    assert all(len(i) == 12 for i in ids)
