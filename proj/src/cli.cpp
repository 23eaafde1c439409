namespace ksym {}
