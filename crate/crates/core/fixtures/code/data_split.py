def handler(event, context):
    return {"step": "data_split", "input": event}
