def handler(event, context):
    return {"step": "data_sourcing", "input": event}
