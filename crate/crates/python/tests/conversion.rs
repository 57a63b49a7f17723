use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::json;

#[test]
fn json_documents_become_python_objects() {
    Python::attach(|py| {
        let v = json!({"schema": 1, "norm": 1.5, "ok": true, "none": null, "dims": [1, 1, 2], "label": "S3"});
        let obj = fdist_py::to_py(py, &v).unwrap();
        let d = obj.bind(py).cast::<PyDict>().unwrap();
        assert_eq!(d.get_item("schema").unwrap().unwrap().extract::<i64>().unwrap(), 1);
        assert_eq!(d.get_item("norm").unwrap().unwrap().extract::<f64>().unwrap(), 1.5);
        assert!(d.get_item("ok").unwrap().unwrap().extract::<bool>().unwrap());
        assert!(d.get_item("none").unwrap().unwrap().is_none());
        let dims = d.get_item("dims").unwrap().unwrap();
        assert_eq!(dims.cast::<PyList>().unwrap().extract::<Vec<usize>>().unwrap(), vec![1, 1, 2]);
        assert_eq!(d.get_item("label").unwrap().unwrap().extract::<String>().unwrap(), "S3");
    });
}
