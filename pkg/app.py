import streamlit as st
from datetime import datetime

from core_math.errors import LabError
from experiment_runner.config import COMMANDS, ExperimentConfig
from experiment_runner.records import ReportRecord
from experiment_runner.report import create_word_document, csv_text
from experiment_runner.runner import run
from dashboard.run_manager import (
    initialize_run_manager,
    add_run,
    get_all_runs,
    get_run_summary,
    get_combined_records,
    discard_run,
    clear_all_runs
)
from lemma_lab.verdicts import CHECKS

# ============================================================================
# PAGE CONFIGURATION
# ============================================================================
st.set_page_config(
    page_title="Communication Cost Lab",
    page_icon="🧮",
    layout="wide"
)

# ============================================================================
# INITIALIZE SESSION STATE
# ============================================================================
initialize_run_manager()

# Widgets per experiment: (label, key, default)
EXPERIMENT_FIELDS = {
    "dfs-quantum": [("Qubits n", "n", 2), ("Shots", "shots", 100_000)],
    "dqs-epsnet": [("Qubits n", "n", 1), ("Accuracy eps", "eps", 0.2), ("Instances", "instances", 200)],
    "raz": [("Dimension N", "N", 16), ("Codebook size K", "K", 4096), ("Trials per label", "trials", 500)],
    "raz-calibrate": [("Dimensions Ns", "Ns", "8,16"), ("Trials per label", "trials", 250)],
    "ddfs": [("Qubits n", "n", 2), ("Shots", "shots", 100_000)],
    "sqrt-sampler": [("Length N", "N", 64), ("Agreeing positions", "agree", 32), ("Trials", "trials", 20_000)],
    "lemma-verify": [],
    "rectangles": [("Cube dimension N", "N", 4), ("Correlation p", "p", 0.0), ("Depth", "depth", 3),
                   ("Protocols", "protocols", 20)],
}

# ============================================================================
# HEADER
# ============================================================================
st.title("Communication Cost Lab")
st.caption("Quantum sampling protocols, their classical simulations and the supporting numeric checks")

# ============================================================================
# STEP 1: CONFIGURE EXPERIMENT
# ============================================================================
st.write("### 1. Experiment")

runnable = [c for c in COMMANDS if c != "report"]
command = st.selectbox("Experiment", runnable, key="command_select")

col1, col2 = st.columns([1, 3])
with col1:
    seed = st.number_input("Seed", min_value=0, value=0, step=1, key="seed_input")

params = {}
if command == "lemma-verify":
    params["check"] = st.selectbox("Check", sorted(CHECKS), key="check_select")
    extra = st.text_input("Extra parameters (key=value, comma separated)", "", key="check_params")
    for item in filter(None, (part.strip() for part in extra.split(","))):
        if "=" in item:
            key, value = item.split("=", 1)
            params[key.strip()] = value.strip()
else:
    columns = st.columns(max(1, len(EXPERIMENT_FIELDS[command])))
    for column, (label, key, default) in zip(columns, EXPERIMENT_FIELDS[command]):
        with column:
            if isinstance(default, str):
                params[key] = st.text_input(label, default, key=f"{command}_{key}")
            elif isinstance(default, float):
                params[key] = st.number_input(label, value=default, format="%.4f", key=f"{command}_{key}")
            else:
                params[key] = int(st.number_input(label, value=default, step=1, key=f"{command}_{key}"))

# ============================================================================
# STEP 2: RUN
# ============================================================================
if st.button("▶️ Run Experiment", type="primary", key="run_btn"):

    status_container = st.status(f"🧪 Running {command}...", expanded=True)

    with status_container:
        st.write(f"⚙️ Parameters: {params}, seed={int(seed)}")

        try:
            records = run(ExperimentConfig(command, int(seed), dict(params)))
            add_run(command, params, records)
            st.write(f"   ✅ {len(records)} record(s) in {records[0].wall_time:.2f}s" if records else "   ✅ Done")
            status_container.update(label="✅ Run Complete!", state="complete", expanded=False)
        except LabError as e:
            add_run(command, params, error=str(e))
            st.error(f"   ❌ {e}")
            status_container.update(label="❌ Failed", state="error", expanded=False)

    st.rerun()

st.markdown("---")

# ============================================================================
# STEP 3: REVIEW RUNS
# ============================================================================
runs = get_all_runs()

if runs:
    st.write("### 2. Runs")

    summary = get_run_summary()
    col1, col2, col3, col4 = st.columns(4)
    col1.metric("Total Runs", summary['total_runs'])
    col2.metric("✅ Succeeded", summary['succeeded'])
    col3.metric("❌ Failed", summary['failed'])
    col4.metric("Records", summary['total_records'])

    st.markdown("---")

    for entry in reversed(runs):
        col1, col2 = st.columns([5, 1])

        with col1:
            icon = "✅" if entry['status'] == 'success' else "❌"
            st.markdown(f"{icon} **{entry['command']}** `{entry['params']}`")
            st.caption(f"Added: {entry['created_at']}")
            if entry['error']:
                st.error(entry['error'])
            for record in entry['records']:
                with st.expander(f"Metrics {record.params}", expanded=False):
                    st.json(record.metrics)

        with col2:
            if st.button("🗑️", key=f"discard_{entry['id']}", help="Discard run"):
                discard_run(entry['id'])
                st.rerun()

    st.markdown("---")

    # ========================================================================
    # STEP 4: DOWNLOAD
    # ========================================================================
    records: list[ReportRecord] = get_combined_records()

    if records:
        st.write("### 📥 Download Results")
        stamp = datetime.now().strftime('%Y%m%d_%H%M%S')

        col1, col2, col3 = st.columns(3)

        with col1:
            st.download_button(
                label="📄 Results (JSONL)",
                data="".join(r.to_json_line() + "\n" for r in records),
                file_name=f"results_{stamp}.jsonl",
                mime="application/json",
                use_container_width=True,
                key="download_jsonl"
            )

        with col2:
            st.download_button(
                label="📊 Results (CSV)",
                data=csv_text(records),
                file_name=f"results_{stamp}.csv",
                mime="text/csv",
                use_container_width=True,
                key="download_csv"
            )

        with col3:
            try:
                word_doc = create_word_document(records)
                st.download_button(
                    label="📄 Report (WORD)",
                    data=word_doc,
                    file_name=f"Lab_Report_{stamp}.docx",
                    mime="application/vnd.openxmlformats-officedocument.wordprocessingml.document",
                    use_container_width=True,
                    key="download_word"
                )
            except Exception as e:
                st.error(f"❌ Error creating Word document: {str(e)}")

    if st.button("🧹 Clear All Runs", key="clear_btn"):
        clear_all_runs()
        st.rerun()
