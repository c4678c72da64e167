"""Session run store behind the Streamlit lab dashboard"""
